//! Radial test fields for the Ornstein-Uhlenbeck problem, all built from
//! Kummer functions against the Gaussian weight `ρ(r) = e^{-r²/4}`:
//!
//! ```text
//! σ_μ(r)  = M(1-μ, n/2+1, r²/4) ρ          (profile of the vector field Φ_μ = x σ_μ)
//! Q_μ(r)  = n M(-μ, n/2, r²/4)             (∇·Φ_μ = Q_μ ρ)
//! ψ_μ(r)  = (n/μ)(1 - M(-μ, n/2, r²/4))    (potential with Φ_μ = ρ∇ψ_μ)
//! I_μ     = (n/(p+1) - (n-2)/2) σ_μ - (1/2 - 1/(p+1)) r σ_μ'
//! J_μ     = r (σ_μ' + (r/2) σ_μ)
//! Π_λ     = I_λ + J_λ
//! ```
//!
//! `⟨α, A_μ α⟩ = |α|² I_μ + ⟨α, ν⟩² J_μ` recovers the quadratic form of the
//! matrix field, and `Π_λ` is its radial restriction. Every ρ-weighted
//! quantity is evaluated through the exponentially scaled Kummer series, so
//! nothing underflows before `r ≈ 50`.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::kummer::{self, KummerArgs, KummerError};

/// Problem data `(n, p, λ)` with the field parameter `μ` defaulting to
/// `max(λ, 0)`, mirroring the pairing used in the triviality argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemParams {
    pub n: u32,
    pub p: f64,
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldsError {
    #[error("invalid problem parameters: need n >= 1 and p > 1, got n = {n}, p = {p}")]
    InvalidParams { n: u32, p: f64 },
    #[error("psi_mu is undefined at mu = 0")]
    MuZero,
    #[error("grid must be strictly increasing with r >= 0")]
    InvalidGrid,
    #[error(transparent)]
    Kummer(#[from] KummerError),
}

impl ProblemParams {
    pub fn new(n: u32, p: f64, lambda: f64) -> Result<Self, FieldsError> {
        if n < 1 || p.is_nan() || p <= 1.0 {
            return Err(FieldsError::InvalidParams { n, p });
        }
        Ok(ProblemParams {
            n,
            p,
            lambda,
            mu: None,
        })
    }

    /// Override the field parameter μ.
    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = Some(mu);
        self
    }

    /// Field parameter: the explicit override, or `max(λ, 0)`.
    pub fn mu(&self) -> f64 {
        self.mu.unwrap_or_else(|| self.lambda.max(0.0))
    }

    /// Sobolev exponent `p_S`: infinite for n ≤ 2, `(n+2)/(n-2)` otherwise.
    pub fn sobolev_exponent(&self) -> f64 {
        sobolev_exponent(self.n)
    }

    /// Whether `p` sits at the critical exponent (finite dimensions only).
    pub fn is_critical(&self) -> bool {
        let ps = self.sobolev_exponent();
        ps.is_finite() && (self.p - ps).abs() <= 1e-12 * ps
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }
}

pub fn sobolev_exponent(n: u32) -> f64 {
    if n <= 2 {
        f64::INFINITY
    } else {
        (n as f64 + 2.0) / (n as f64 - 2.0)
    }
}

/// Threshold `λ* = 3n / (2(n-1))` above which the radial quadratic form can
/// turn negative near the origin; defined for n ≥ 2.
pub fn lambda_star(n: u32) -> f64 {
    assert!(n >= 2, "lambda_star needs n >= 2");
    3.0 * n as f64 / (2.0 * (n as f64 - 1.0))
}

/// Gaussian weight `ρ(r) = e^{-r²/4}`.
pub fn weight_rho(r: f64) -> f64 {
    (-r * r / 4.0).exp()
}

/// `σ_μ(r) = M(1-μ, n/2+1, r²/4) ρ(r)`, evaluated in scaled form.
pub fn sigma(params: &ProblemParams, mu: f64, r: f64) -> Result<f64, FieldsError> {
    let xi = r * r / 4.0;
    Ok(kummer::kummer_m_scaled(KummerArgs::new(
        1.0 - mu,
        params.nf() / 2.0 + 1.0,
        xi,
    ))?)
}

/// `Q_μ(r) = n M(-μ, n/2, r²/4)`, normalised to `Q_μ(0) = n`; solves the
/// radial eigenproblem `Q'' + ((n-1)/r - r/2) Q' + μ Q = 0`.
pub fn q_field(params: &ProblemParams, mu: f64, r: f64) -> Result<f64, FieldsError> {
    let xi = r * r / 4.0;
    Ok(params.nf() * kummer::kummer_m(KummerArgs::new(-mu, params.nf() / 2.0, xi))?)
}

/// `ψ_μ(r) = (n/μ)(1 - M(-μ, n/2, r²/4))`; satisfies `Q_μ = n - μ ψ_μ` and
/// `ψ_μ(0) = 0`.
pub fn psi(params: &ProblemParams, mu: f64, r: f64) -> Result<f64, FieldsError> {
    if mu == 0.0 {
        return Err(FieldsError::MuZero);
    }
    let xi = r * r / 4.0;
    let m = kummer::kummer_m(KummerArgs::new(-mu, params.nf() / 2.0, xi))?;
    Ok(params.nf() / mu * (1.0 - m))
}

/// `∇·Φ_μ = n M(-μ, n/2, r²/4) ρ = n σ_μ + r σ_μ'`, evaluated in scaled form.
pub fn div_phi(params: &ProblemParams, mu: f64, r: f64) -> Result<f64, FieldsError> {
    let xi = r * r / 4.0;
    Ok(params.nf() * kummer::kummer_m_scaled(KummerArgs::new(-mu, params.nf() / 2.0, xi))?)
}

/// `-r σ_μ'(r) = (n/2+μ)/(n/2+1) · M(1-μ, n/2+2, r²/4) · (r²/2) ρ`.
pub fn neg_r_sigma_prime(params: &ProblemParams, mu: f64, r: f64) -> Result<f64, FieldsError> {
    let half_n = params.nf() / 2.0;
    let xi = r * r / 4.0;
    let m = kummer::kummer_m_scaled(KummerArgs::new(1.0 - mu, half_n + 2.0, xi))?;
    Ok((half_n + mu) / (half_n + 1.0) * m * (r * r / 2.0))
}

/// `σ_μ' + (r/2) σ_μ = (r/2) · (1-μ)/(n/2+1) · M(2-μ, n/2+2, r²/4) ρ`.
pub fn sigma_prime_plus(params: &ProblemParams, mu: f64, r: f64) -> Result<f64, FieldsError> {
    let half_n = params.nf() / 2.0;
    if mu == 1.0 {
        return Ok(0.0);
    }
    let xi = r * r / 4.0;
    let m = kummer::kummer_m_scaled(KummerArgs::new(2.0 - mu, half_n + 2.0, xi))?;
    Ok(r / 2.0 * (1.0 - mu) / (half_n + 1.0) * m)
}

/// Coefficients of the quadratic form `⟨α, A_μ α⟩ = |α|² I + ⟨α,ν⟩² J`.
pub fn ij_coeffs(params: &ProblemParams, mu: f64, r: f64) -> Result<(f64, f64), FieldsError> {
    let nf = params.nf();
    let c_sigma = nf / (params.p + 1.0) - (nf - 2.0) / 2.0;
    let c_grad = 0.5 - 1.0 / (params.p + 1.0);
    let i = c_sigma * sigma(params, mu, r)? + c_grad * neg_r_sigma_prime(params, mu, r)?;
    let j = r * sigma_prime_plus(params, mu, r)?;
    Ok((i, j))
}

/// `Π_λ(r) = I_λ + J_λ`, the quadratic form on radial directions at `μ = λ`.
pub fn pi_profile(params: &ProblemParams, r: f64) -> Result<f64, FieldsError> {
    let (i, j) = ij_coeffs(params, params.lambda, r)?;
    Ok(i + j)
}

/// `(r²/4)^{n/2+λ-1} Π_λ(r)`, assembled from scaled Kummer values so the sign
/// stays exact out to large radii where `Π_λ` itself is below the underflow
/// edge of the naive product.
pub fn pi_rescaled(params: &ProblemParams, r: f64) -> Result<f64, FieldsError> {
    let nf = params.nf();
    let half_n = nf / 2.0;
    let lambda = params.lambda;
    let xi = r * r / 4.0;
    let u1_rho = kummer::kummer_m_scaled(KummerArgs::new(2.0 - lambda, half_n + 2.0, xi))?;
    let u2_rho = kummer::kummer_m_scaled(KummerArgs::new(1.0 - lambda, half_n + 2.0, xi))?;
    let u3_rho = kummer::kummer_m_scaled(KummerArgs::new(1.0 - lambda, half_n + 1.0, xi))?;
    let coeff = (half_n + lambda) / (half_n + 1.0);
    let combo = (1.0 - lambda) / (half_n + lambda) * u1_rho + u2_rho / nf;
    let c_sigma = nf / (params.p + 1.0) - (nf - 2.0) / 2.0;
    let pow = xi.powf(half_n + lambda);
    Ok(coeff * combo * 2.0 * xi * pow / xi + c_sigma * u3_rho * pow / xi)
}

/// Origin behaviour of `Π_λ`: for `n ≥ 3` at the critical exponent this is the
/// limit of `r^{-2} Π_λ(r)`; for `n ∈ {1, 2}` (and away from the critical
/// case) `Π_λ(0)` itself, which equals `n/(p+1) - (n-2)/2`.
pub fn pi_origin_limit(params: &ProblemParams) -> f64 {
    let nf = params.nf();
    if params.n >= 3 && params.is_critical() {
        let half_n = nf / 2.0;
        let lambda = params.lambda;
        (half_n + lambda) / (nf + 2.0) * ((1.0 - lambda) / (half_n + lambda) + 1.0 / nf)
    } else {
        nf / (params.p + 1.0) - (nf - 2.0) / 2.0
    }
}

/// Sampled radial profile of the test-field quantities.
#[derive(Debug, Clone, Serialize)]
pub struct FieldProfile {
    pub grid: Vec<f64>,
    pub sigma: Vec<f64>,
    pub q: Vec<f64>,
    pub neg_r_sigma_prime: Vec<f64>,
    pub sigma_prime_plus: Vec<f64>,
    pub i_coef: Vec<f64>,
    pub j_coef: Vec<f64>,
    pub pi: Vec<f64>,
}

impl FieldProfile {
    /// Evaluate every quantity at the field parameter `mu` over `grid`.
    /// `pi` is the pointwise sum `i_coef + j_coef`.
    pub fn compute(params: &ProblemParams, mu: f64, grid: &[f64]) -> Result<Self, FieldsError> {
        if grid.is_empty() || grid[0] < 0.0 || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FieldsError::InvalidGrid);
        }
        let n = grid.len();
        let mut profile = FieldProfile {
            grid: grid.to_vec(),
            sigma: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            neg_r_sigma_prime: Vec::with_capacity(n),
            sigma_prime_plus: Vec::with_capacity(n),
            i_coef: Vec::with_capacity(n),
            j_coef: Vec::with_capacity(n),
            pi: Vec::with_capacity(n),
        };
        for &r in grid {
            profile.sigma.push(sigma(params, mu, r)?);
            profile.q.push(q_field(params, mu, r)?);
            profile
                .neg_r_sigma_prime
                .push(neg_r_sigma_prime(params, mu, r)?);
            profile.sigma_prime_plus.push(sigma_prime_plus(params, mu, r)?);
            let (i, j) = ij_coeffs(params, mu, r)?;
            profile.i_coef.push(i);
            profile.j_coef.push(j);
            profile.pi.push(i + j);
        }
        Ok(profile)
    }

    /// CSV with header `r,sigma,q,I,J,pi`, one row per grid point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "r,sigma,q,I,J,pi")?;
        for k in 0..self.grid.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.grid[k], self.sigma[k], self.q[k], self.i_coef[k], self.j_coef[k], self.pi[k]
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kummer::{kummer_m, kummer_m_dxi};
    use crate::numerics::{integrate, QuadratureSpec};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn params(n: u32, p: f64, lambda: f64) -> ProblemParams {
        ProblemParams::new(n, p, lambda).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(ProblemParams::new(0, 3.0, 1.0).is_err());
        assert!(ProblemParams::new(3, 1.0, 1.0).is_err());
        assert!(ProblemParams::new(3, 5.0, 1.0).is_ok());
    }

    #[test]
    fn derived_constants() {
        assert_eq!(sobolev_exponent(1), f64::INFINITY);
        assert_eq!(sobolev_exponent(2), f64::INFINITY);
        assert_eq!(sobolev_exponent(3), 5.0);
        assert_eq!(sobolev_exponent(4), 3.0);
        assert_eq!(lambda_star(4), 2.0);
        assert_eq!(lambda_star(3), 2.25);
        assert_eq!(lambda_star(7), 1.75);
        assert_eq!(params(3, 3.0, -0.5).mu(), 0.0);
        assert_eq!(params(3, 3.0, 1.5).mu(), 1.5);
        assert_eq!(params(3, 3.0, 1.5).with_mu(0.25).mu(), 0.25);
    }

    #[test]
    fn rho_values() {
        assert_eq!(weight_rho(0.0), 1.0);
        assert_relative_eq!(weight_rho(2.0), (-1.0f64).exp(), max_relative = 1e-15);
        assert!(weight_rho(40.0) < 1e-170);
    }

    #[test]
    fn sigma_values() {
        let p = params(3, 3.0, 1.0);
        // mu = 1 collapses sigma to the weight itself
        for &r in &[0.0, 0.7, 2.0, 5.0] {
            assert_relative_eq!(sigma(&p, 1.0, r).unwrap(), weight_rho(r), max_relative = 1e-13);
        }
        assert_eq!(sigma(&p, 0.0, 0.0).unwrap(), 1.0);
        let expect = kummer_m(KummerArgs::new(1.0, 2.5, 1.0)).unwrap() * weight_rho(2.0);
        assert_relative_eq!(sigma(&p, 0.0, 2.0).unwrap(), expect, max_relative = 1e-12);
    }

    #[test]
    fn q_field_values() {
        let p3 = params(3, 3.0, 1.0);
        for &r in &[0.0, 1.0, 2.5, 6.0] {
            assert_relative_eq!(
                q_field(&p3, 1.0, r).unwrap(),
                3.0 - r * r / 2.0,
                max_relative = 1e-13,
                epsilon = 1e-13
            );
            assert_eq!(q_field(&p3, 0.0, r).unwrap(), 3.0);
        }
        let p4 = params(4, 3.0, 2.0);
        let series = 4.0 * (1.0 - 0.25 + 0.0625 / 6.0);
        assert_relative_eq!(q_field(&p4, 2.0, 1.0).unwrap(), series, max_relative = 1e-14);
    }

    #[test]
    fn psi_values() {
        let p = params(3, 3.0, 1.0);
        for &r in &[0.5, 1.0, 3.0] {
            assert_relative_eq!(psi(&p, 1.0, r).unwrap(), r * r / 2.0, max_relative = 1e-13);
        }
        assert_eq!(psi(&p, 2.0, 0.0).unwrap(), 0.0);
        assert_eq!(psi(&p, 0.0, 1.0), Err(FieldsError::MuZero));
        let p4 = params(4, 3.0, 2.0);
        let m = kummer_m(KummerArgs::new(-2.0, 2.0, 0.25)).unwrap();
        assert_relative_eq!(psi(&p4, 2.0, 1.0).unwrap(), 2.0 * (1.0 - m), max_relative = 1e-14);
    }

    #[test]
    fn q_equals_n_minus_mu_psi() {
        for &n in &[2u32, 3, 5] {
            let p = params(n, 3.0, 1.0);
            for &mu in &[-1.0, 0.5, 1.0, 2.0] {
                for &r in &[0.3, 1.0, 4.0, 9.0] {
                    let q = q_field(&p, mu, r).unwrap();
                    let rhs = p.nf() - mu * psi(&p, mu, r).unwrap();
                    assert_relative_eq!(q, rhs, max_relative = 1e-10, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn div_phi_values() {
        let p = params(3, 3.0, 1.0);
        assert_eq!(div_phi(&p, 0.0, 0.0).unwrap(), 3.0);
        for &r in &[0.5, 2.0] {
            assert_relative_eq!(
                div_phi(&p, 0.0, r).unwrap(),
                3.0 * weight_rho(r),
                max_relative = 1e-13
            );
        }
        // mu = 1: root of the Hermite factor n - r²/2 at r = √(2n)
        let r0 = (2.0 * p.nf()).sqrt();
        assert_abs_diff_eq!(div_phi(&p, 1.0, r0).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn div_phi_matches_n_sigma_plus_r_sigma_prime() {
        let p = params(4, 2.0, 0.5);
        for &mu in &[0.0, 0.5, 1.0, 2.0] {
            for &r in &[0.4, 1.3, 3.0, 7.0] {
                let h = 1e-5 * (1.0 + r);
                let dsigma =
                    (sigma(&p, mu, r + h).unwrap() - sigma(&p, mu, r - h).unwrap()) / (2.0 * h);
                let lhs = div_phi(&p, mu, r).unwrap();
                let rhs = p.nf() * sigma(&p, mu, r).unwrap() + r * dsigma;
                assert_relative_eq!(lhs, rhs, max_relative = 1e-6, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn neg_r_sigma_prime_values() {
        let p = params(3, 3.0, 0.0);
        assert_eq!(neg_r_sigma_prime(&p, 0.0, 0.0).unwrap(), 0.0);
        let expect = 1.5 / 2.5
            * kummer_m(KummerArgs::new(1.0, 3.5, 0.25)).unwrap()
            * 0.5
            * weight_rho(1.0);
        assert_relative_eq!(neg_r_sigma_prime(&p, 0.0, 1.0).unwrap(), expect, max_relative = 1e-12);
        // strict positivity inside mu in (-n/2, 1]; the coefficient n/2 + mu
        // vanishes identically at the left endpoint
        for &mu in &[-1.4, -0.5, 0.0, 0.7, 1.0] {
            for &r in &[0.1, 1.0, 5.0, 20.0] {
                assert!(neg_r_sigma_prime(&p, mu, r).unwrap() > 0.0);
            }
        }
        assert_eq!(neg_r_sigma_prime(&p, -1.5, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn sigma_prime_plus_values() {
        let p = params(3, 3.0, 0.0);
        for &r in &[0.0, 1.0, 4.0] {
            assert_eq!(sigma_prime_plus(&p, 1.0, r).unwrap(), 0.0);
        }
        let expect = 1.0 / 2.5 * kummer_m(KummerArgs::new(2.0, 3.5, 1.0)).unwrap() * weight_rho(2.0);
        assert_relative_eq!(sigma_prime_plus(&p, 0.0, 2.0).unwrap(), expect, max_relative = 1e-12);
        for &mu in &[-2.0, 0.0, 0.9] {
            for &r in &[0.2, 2.0, 10.0] {
                assert!(sigma_prime_plus(&p, mu, r).unwrap() > 0.0);
            }
        }
        // cross-check against finite differences of sigma
        for &mu in &[0.0, 0.5, 2.0] {
            for &r in &[0.8, 2.5, 6.0] {
                let h = 1e-5;
                let ds = (sigma(&p, mu, r + h).unwrap() - sigma(&p, mu, r - h).unwrap()) / (2.0 * h);
                let expect = ds + r / 2.0 * sigma(&p, mu, r).unwrap();
                assert_relative_eq!(
                    sigma_prime_plus(&p, mu, r).unwrap(),
                    expect,
                    max_relative = 1e-6,
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn ij_special_cases() {
        // mu = 1 kills J
        let p = params(4, 2.5, 1.0);
        for &r in &[0.3, 2.0, 8.0] {
            let (_, j) = ij_coeffs(&p, 1.0, r).unwrap();
            assert_eq!(j, 0.0);
        }
        // critical coefficient vanishes: n = 3, p = 5
        let p = params(3, 5.0, 1.0);
        let (i, _) = ij_coeffs(&p, 1.0, 1e-8).unwrap();
        assert_abs_diff_eq!(i, 0.0, epsilon = 1e-12);
        // n = 2, p = 3, mu = 0: both coefficients positive
        let p = params(2, 3.0, 0.0);
        let (i, _) = ij_coeffs(&p, 0.0, 1.0).unwrap();
        assert!(i > 0.0);
    }

    #[test]
    fn pi_is_i_plus_j() {
        let p = params(5, sobolev_exponent(5), 1.875);
        for &r in &[0.1, 1.0, 3.0, 10.0, 25.0] {
            let (i, j) = ij_coeffs(&p, p.lambda, r).unwrap();
            let pi = pi_profile(&p, r).unwrap();
            assert_abs_diff_eq!(pi, i + j, epsilon = 1e-12 * (i.abs() + j.abs()).max(1e-30));
        }
    }

    #[test]
    fn pi_at_lambda_one_critical() {
        // Π_1 = (r²/2n) ρ at p = p_S, any n ≥ 3
        let p = params(3, 5.0, 1.0);
        for &r in &[0.5, 1.0, 2.0, 6.0] {
            let expect = r * r / (2.0 * p.nf()) * weight_rho(r);
            assert_relative_eq!(pi_profile(&p, r).unwrap(), expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn pi_matches_u_form_at_critical_p() {
        // at p = p_S, n ≥ 3: Π_λ = (n/2+λ)/(n/2+1) [ (1-λ)/(n/2+λ) u1 + u2/n ] (r²/2) ρ
        for &(n, lambda) in &[(3u32, 1.5), (4, 2.0), (5, 1.875), (4, 3.5)] {
            let p = params(n, sobolev_exponent(n), lambda);
            let half_n = p.nf() / 2.0;
            for &r in &[0.3, 1.0, 2.7, 8.0] {
                let xi = r * r / 4.0;
                let u1 = kummer_m(KummerArgs::new(2.0 - lambda, half_n + 2.0, xi)).unwrap();
                let u2 = kummer_m(KummerArgs::new(1.0 - lambda, half_n + 2.0, xi)).unwrap();
                let expect = (half_n + lambda) / (half_n + 1.0)
                    * ((1.0 - lambda) / (half_n + lambda) * u1 + u2 / p.nf())
                    * (r * r / 2.0)
                    * weight_rho(r);
                let got = pi_profile(&p, r).unwrap();
                assert_relative_eq!(got, expect, max_relative = 1e-9, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn pi_rescaled_matches_direct_product() {
        for &(n, lambda) in &[(3u32, 1.5), (5, 2.5), (4, 3.5)] {
            let p = params(n, sobolev_exponent(n), lambda);
            for &r in &[2.0f64, 5.0, 10.0] {
                let xi = r * r / 4.0;
                let direct = xi.powf(p.nf() / 2.0 + lambda - 1.0) * pi_profile(&p, r).unwrap();
                let scaled = pi_rescaled(&p, r).unwrap();
                assert_relative_eq!(scaled, direct, max_relative = 1e-9, epsilon = 1e-20);
            }
        }
    }

    #[test]
    fn pi_origin_values() {
        assert_abs_diff_eq!(pi_origin_limit(&params(4, 3.0, 2.0)), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pi_origin_limit(&params(3, 5.0, 2.25)), 0.0, epsilon = 1e-15);
        assert_relative_eq!(pi_origin_limit(&params(1, 3.0, 0.7)), 0.75, max_relative = 1e-15);
        // negative past lambda_star
        assert!(pi_origin_limit(&params(5, sobolev_exponent(5), 2.2)) < 0.0);
    }

    #[test]
    fn pi_negative_start_at_lambda_star() {
        // n = 5, λ = λ*(5) = 1.875, p = p_S: Π starts nonpositive and decreases
        let p = params(5, sobolev_exponent(5), 1.875);
        assert!(pi_profile(&p, 1.0).unwrap() < 0.0);
        assert!(pi_origin_limit(&p).abs() < 1e-14);
    }

    #[test]
    fn averaging_formula() {
        // ball average of M(-μ, n/2, |y|²/4) ρ equals M(1-μ, n/2+1, r²/4) ρ
        let spec = QuadratureSpec::default();
        for &mu in &[0.0, 0.5, 1.0, 2.0] {
            for &n in &[1u32, 3, 5] {
                let p = params(n, 3.0, 1.0);
                for &r in &[0.5f64, 2.0, 6.0] {
                    let nf = n as f64;
                    let avg = nf / r.powi(n as i32)
                        * integrate(
                            |s| {
                                s.powi(n as i32 - 1)
                                    * kummer::kummer_m_scaled(KummerArgs::new(
                                        -mu,
                                        nf / 2.0,
                                        s * s / 4.0,
                                    ))
                                    .unwrap()
                            },
                            0.0,
                            r,
                            &spec,
                        )
                        .unwrap();
                    let rhs = sigma(&p, mu, r).unwrap();
                    assert_abs_diff_eq!(avg, rhs, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn a_field_normal_component_vanishes() {
        // ρ Q_λ' + λ r σ_λ = 0
        for &lambda in &[0.5, 1.0, 2.0] {
            for &n in &[2u32, 3, 5] {
                let p = params(n, 3.0, lambda);
                for &r in &[0.5, 1.5, 4.0, 9.0] {
                    let xi = r * r / 4.0;
                    let dq = p.nf()
                        * kummer_m_dxi(KummerArgs::new(-lambda, p.nf() / 2.0, xi)).unwrap()
                        * r
                        / 2.0;
                    let lhs = weight_rho(r) * dq + lambda * r * sigma(&p, lambda, r).unwrap();
                    let scale = (lambda * r * sigma(&p, lambda, r).unwrap()).abs();
                    assert!(lhs.abs() <= 1e-9 * scale.max(1e-30), "n={n} λ={lambda} r={r}");
                }
            }
        }
    }

    #[test]
    fn quadratic_form_reconstruction() {
        // ⟨α, A α⟩ assembled directly from A = [σ - c(nσ + rσ')] Id + J ν⊗ν
        // against the I/J split, for explicit vectors.
        let dirs: [[f64; 4]; 3] = [
            [0.6, -0.8, 0.0, 0.0],
            [0.36, 0.48, 0.8, 0.0],
            [-0.5, 0.5, 0.5, 0.5],
        ];
        let alphas: [[f64; 4]; 2] = [[1.0, 2.0, -1.0, 0.5], [0.3, -0.7, 0.2, 1.1]];
        for &n in &[2u32, 3, 4] {
            let p = params(n, 2.5, 0.5);
            for &mu in &[0.0, 0.5, 1.0] {
                for &r in &[0.5, 1.0, 3.0, 10.0] {
                    let h = 1e-5 * (1.0 + r);
                    let s = sigma(&p, mu, r).unwrap();
                    let ds =
                        (sigma(&p, mu, r + h).unwrap() - sigma(&p, mu, r - h).unwrap()) / (2.0 * h);
                    let div = p.nf() * s + r * ds;
                    let c_grad = 0.5 - 1.0 / (p.p + 1.0);
                    let diag = s - c_grad * div;
                    let jj = r * (ds + r / 2.0 * s);
                    let (i, j) = ij_coeffs(&p, mu, r).unwrap();
                    for nu in dirs.iter() {
                        for alpha in alphas.iter() {
                            let d = n as usize;
                            let norm2: f64 = alpha[..d].iter().map(|x| x * x).sum();
                            let dot: f64 =
                                alpha[..d].iter().zip(&nu[..d]).map(|(a, v)| a * v).sum();
                            let direct = diag * norm2 + jj * dot * dot;
                            let split = i * norm2 + j * dot * dot;
                            assert_relative_eq!(
                                direct,
                                split,
                                max_relative = 1e-6,
                                epsilon = 1e-10
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn profile_construction_and_csv() {
        let p = params(3, 5.0, 1.0);
        let grid: Vec<f64> = (0..50).map(|i| i as f64 * 0.5).collect();
        let profile = FieldProfile::compute(&p, p.mu(), &grid).unwrap();
        assert_eq!(profile.sigma[0], 1.0);
        assert_eq!(profile.q[0], 3.0);
        for k in 0..grid.len() {
            assert_abs_diff_eq!(
                profile.pi[k],
                profile.i_coef[k] + profile.j_coef[k],
                epsilon = 1e-15
            );
        }
        let mut buf = Vec::new();
        profile.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("r,sigma,q,I,J,pi\n"));
        assert_eq!(text.lines().count(), grid.len() + 1);

        let bad = FieldProfile::compute(&p, 1.0, &[1.0, 1.0]);
        assert_eq!(bad.unwrap_err(), FieldsError::InvalidGrid);
    }
}

//! Definiteness classification of the matrix field `A_μ` over `(n, p, λ)`.
//!
//! The closed-form ranges are: `A_μ` positive definite off the origin for
//! `μ ∈ [-n/2, 1]` and `p ≤ p_S`; negative definite on radial directions for
//! `p = p_S`, `n ≥ 4` and `λ ∈ [λ*, 2]` with `λ* = 3n/(2(n-1))`; indefinite
//! otherwise. [`classify`] confirms the containment by a sign scan of `I_μ`,
//! `J_μ` and `Π_λ`, recording witnesses where signs change.
//!
//! The module also carries the large-radius sign table of `Π_λ`, the Sturmian
//! ordering of the first roots of the three Kummer profiles entering `Π_λ`,
//! and a pointwise check of the Picone identity used to interlace those
//! roots.

use serde::Serialize;
use thiserror::Error;

use crate::fields::{self, FieldsError, ProblemParams};
use crate::kummer::{self, KummerArgs, KummerError};

/// Values below `ZERO_TOL` times the local magnitude envelope count as zero,
/// so identically vanishing quantities (e.g. `J_1 ≡ 0`) are not misread as
/// sign changes.
const ZERO_TOL: f64 = 1e-13;
/// Radius where the sign scan starts; `Π_λ` vanishes quadratically at 0.
const SCAN_START: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    PositiveDefinite,
    NegativeDefiniteRadial,
    Indefinite,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::PositiveDefinite => "PositiveDefinite",
            Classification::NegativeDefiniteRadial => "NegativeDefiniteRadial",
            Classification::Indefinite => "Indefinite",
        };
        f.write_str(s)
    }
}

/// Which scanned quantity changed sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quantity {
    I,
    J,
    Pi,
}

/// A sign change witness: `quantity` switches to `new_sign` at radius `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignChange {
    pub quantity: Quantity,
    pub r: f64,
    pub new_sign: i8,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    pub params: ProblemParams,
    pub mu: f64,
    pub classification: Classification,
    pub analytic_prediction: Classification,
    pub evidence: Vec<SignChange>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub markers: Option<SturmMarkers>,
}

impl RegimeReport {
    /// Radius of the earliest recorded sign change, if any.
    pub fn first_sign_change_r(&self) -> Option<f64> {
        self.evidence
            .iter()
            .map(|e| e.r)
            .min_by(|a, b| a.partial_cmp(b).unwrap())
    }
}

/// First positive roots (in `r`) of the Kummer profiles
/// `u₁ = M(2-λ, n/2+2, r²/4)`, `u₂ = M(1-λ, n/2+2, r²/4)`,
/// `u₃ = M(1-λ, n/2+1, r²/4)`, ordered `root_u3 < ι < κ` for `λ > 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SturmMarkers {
    pub root_u3: f64,
    /// First root of `u₂`; `Π_λ(ι) < 0`.
    pub iota: f64,
    /// First root of `u₁`.
    pub kappa: f64,
    /// Second root of `u₁`, when it exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa2: Option<f64>,
    /// A root of `u₂` inside `(κ, κ')` with `Π_λ(ι') > 0`, for `λ > 3`, n ≥ 3.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iota2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegimeError {
    #[error("asymptotic sign is defined for lambda > 1, got {lambda}")]
    DomainError { lambda: f64 },
    #[error("u1 = M(2-lambda, n/2+2, .) has no positive root for lambda = {lambda} <= 2")]
    NoKappa { lambda: f64 },
    #[error("Sturm markers need lambda > 1, got {lambda}")]
    LambdaTooSmall { lambda: f64 },
    #[error("marker ordering violated: root_u3 = {root_u3}, iota = {iota}, kappa = {kappa}")]
    MarkerOrdering { root_u3: f64, iota: f64, kappa: f64 },
    #[error("omega vanishes (|omega| < 1e-12) at r = {r}")]
    OmegaVanishes { r: f64 },
    #[error(transparent)]
    Fields(#[from] FieldsError),
    #[error(transparent)]
    Kummer(#[from] KummerError),
}

fn sign_with_tol(value: f64, envelope: f64) -> i8 {
    if value.abs() <= ZERO_TOL * envelope {
        0
    } else if value > 0.0 {
        1
    } else {
        -1
    }
}

/// Magnitude envelope for I, J, Π at radius `r`: the sum of the absolute
/// constituent terms, so boundary-exact zeros sit below it while genuinely
/// tiny tail values (which share the envelope's decay) stay classified.
fn envelope(params: &ProblemParams, mu: f64, r: f64) -> Result<f64, FieldsError> {
    let s = fields::sigma(params, mu, r)?.abs();
    let nrsp = fields::neg_r_sigma_prime(params, mu, r)?.abs();
    let spp = fields::sigma_prime_plus(params, mu, r)?.abs();
    Ok(s * (1.0 + r * r / 2.0) + nrsp + r * spp)
}

/// Closed-form classification of `A_μ` from the parameter ranges alone.
pub fn analytic_prediction(params: &ProblemParams, mu: f64) -> Classification {
    let nf = params.nf();
    let ps = params.sobolev_exponent();
    let tol = 1e-12;
    if mu >= -nf / 2.0 - tol && mu <= 1.0 + tol && params.p <= ps * (1.0 + tol) {
        Classification::PositiveDefinite
    } else if params.n >= 4
        && params.is_critical()
        && params.lambda >= fields::lambda_star(params.n) - tol
        && params.lambda <= 2.0 + tol
    {
        Classification::NegativeDefiniteRadial
    } else {
        Classification::Indefinite
    }
}

/// Scan `I_μ`, `J_μ` (general directions) and `Π_λ` (radial directions) for
/// sign changes on `(0, r_max]` and classify. The scan agrees with
/// [`analytic_prediction`] strictly inside the closed-form ranges.
pub fn classify(
    params: &ProblemParams,
    r_max: f64,
    grid_points: usize,
) -> Result<RegimeReport, RegimeError> {
    assert!(r_max >= 30.0, "scan needs r_max >= 30");
    assert!(grid_points >= 500, "scan needs at least 500 grid points");
    let mu = params.mu();

    let mut evidence = Vec::new();
    let mut ij_nonneg = true;
    let mut ij_positive_somewhere = false;
    let mut pi_nonpos = true;
    let mut pi_negative_somewhere = false;

    let mut prev: Option<(f64, i8, i8, i8)> = None;
    for k in 0..grid_points {
        let r = SCAN_START + (r_max - SCAN_START) * k as f64 / (grid_points - 1) as f64;
        let env_mu = envelope(params, mu, r)?;
        let (i, j) = fields::ij_coeffs(params, mu, r)?;
        let (si, sj) = (sign_with_tol(i, env_mu), sign_with_tol(j, env_mu));
        let spi = if mu == params.lambda {
            sign_with_tol(i + j, env_mu)
        } else {
            let env_l = envelope(params, params.lambda, r)?;
            sign_with_tol(fields::pi_profile(params, r)?, env_l)
        };

        ij_nonneg &= si >= 0 && sj >= 0;
        ij_positive_somewhere |= si > 0 || sj > 0;
        pi_nonpos &= spi <= 0;
        pi_negative_somewhere |= spi < 0;

        if let Some((rp, pi_, pj_, ppi_)) = prev {
            record_flip(&mut evidence, Quantity::I, params, mu, rp, pi_, r, si);
            record_flip(&mut evidence, Quantity::J, params, mu, rp, pj_, r, sj);
            record_flip(&mut evidence, Quantity::Pi, params, params.lambda, rp, ppi_, r, spi);
        }
        prev = Some((r, si, sj, spi));
    }

    let origin = fields::pi_origin_limit(params);
    let classification = if ij_nonneg && ij_positive_somewhere {
        Classification::PositiveDefinite
    } else if pi_nonpos && pi_negative_somewhere && origin <= ZERO_TOL {
        Classification::NegativeDefiniteRadial
    } else {
        Classification::Indefinite
    };

    // Sturm markers exist once u1 has a root (λ > 2); attach them as extra
    // evidence when available.
    let markers = if params.lambda > 2.0 {
        sturm_markers(params).ok()
    } else {
        None
    };

    Ok(RegimeReport {
        params: *params,
        mu,
        classification,
        analytic_prediction: analytic_prediction(params, mu),
        evidence,
        markers,
    })
}

#[allow(clippy::too_many_arguments)]
fn record_flip(
    evidence: &mut Vec<SignChange>,
    quantity: Quantity,
    params: &ProblemParams,
    mu: f64,
    r_prev: f64,
    s_prev: i8,
    r: f64,
    s: i8,
) {
    if s_prev == 0 || s == 0 || s_prev == s {
        return;
    }
    // refine the crossing radius by bisection on the raw value
    let f = |r: f64| -> f64 {
        match quantity {
            Quantity::I => fields::ij_coeffs(params, mu, r).map(|(i, _)| i).unwrap_or(f64::NAN),
            Quantity::J => fields::ij_coeffs(params, mu, r).map(|(_, j)| j).unwrap_or(f64::NAN),
            Quantity::Pi => fields::pi_profile(params, r).unwrap_or(f64::NAN),
        }
    };
    let (mut lo, mut hi) = (r_prev, r);
    let mut flo = f(lo);
    for _ in 0..60 {
        if hi - lo <= 1e-10 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if flo * fm <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    evidence.push(SignChange {
        quantity,
        r: 0.5 * (lo + hi),
        new_sign: s,
    });
}

/// Sign taken by `Π_λ` as `r → ∞` for `λ > 1`: the sign of `(1-λ)/Γ(2-λ)` off
/// the integers, and `(-1)^{m-1}` at integer `λ = m ≥ 2` (where `Γ(2-λ)` sits
/// on a pole and the Kummer profiles degenerate to polynomials).
pub fn asymptotic_sign(lambda: f64) -> Result<i8, RegimeError> {
    if lambda <= 1.0 {
        return Err(RegimeError::DomainError { lambda });
    }
    let rounded = lambda.round();
    if (lambda - rounded).abs() < 1e-12 {
        let m = rounded as i64;
        return Ok(if (m - 1) % 2 == 0 { 1 } else { -1 });
    }
    let v = (1.0 - lambda) / kummer::gamma(2.0 - lambda);
    Ok(if v > 0.0 { 1 } else { -1 })
}

/// Map a ξ-axis root list to the r axis via `r = 2√ξ`.
fn to_radius(roots: &[f64]) -> Vec<f64> {
    roots.iter().map(|xi| 2.0 * xi.sqrt()).collect()
}

/// Locate the Sturm markers of `Π_λ` and verify their ordering and the signs
/// `Π_λ(ι) < 0` (and `Π_λ(ι') > 0` when `λ > 3`, `n ≥ 3`).
pub fn sturm_markers(params: &ProblemParams) -> Result<SturmMarkers, RegimeError> {
    let lambda = params.lambda;
    if lambda <= 1.0 {
        return Err(RegimeError::LambdaTooSmall { lambda });
    }
    if lambda <= 2.0 {
        return Err(RegimeError::NoKappa { lambda });
    }
    let half_n = params.nf() / 2.0;

    let u1 = to_radius(&kummer::positive_roots_auto(2.0 - lambda, half_n + 2.0)?.roots);
    let u2 = to_radius(&kummer::positive_roots_auto(1.0 - lambda, half_n + 2.0)?.roots);
    let u3 = to_radius(&kummer::positive_roots_auto(1.0 - lambda, half_n + 1.0)?.roots);
    let (kappa, root_u3, iota) = match (u1.first(), u3.first(), u2.first()) {
        (Some(&k), Some(&r3), Some(&i)) => (k, r3, i),
        _ => return Err(RegimeError::NoKappa { lambda }),
    };
    if !(0.0 < root_u3 && root_u3 < iota && iota < kappa) {
        return Err(RegimeError::MarkerOrdering { root_u3, iota, kappa });
    }
    if fields::pi_profile(params, iota)? >= 0.0 {
        return Err(RegimeError::MarkerOrdering { root_u3, iota, kappa });
    }

    let kappa2 = u1.get(1).copied();
    let mut iota2 = None;
    if params.n >= 3 && lambda > 3.0 {
        if let Some(k2) = kappa2 {
            iota2 = u2.iter().copied().find(|&r| kappa < r && r < k2);
            if let Some(i2) = iota2 {
                if fields::pi_profile(params, i2)? <= 0.0 {
                    return Err(RegimeError::MarkerOrdering { root_u3, iota, kappa });
                }
            }
        }
    }

    Ok(SturmMarkers {
        root_u3,
        iota,
        kappa,
        kappa2,
        iota2,
    })
}

/// Pointwise residual of the Picone identity for two Kummer profiles
/// `v = M(a_v, b_v, r²/4)`, `ω = M(a_ω, b_ω, r²/4)` against the common weight
/// `K = L = r^m ρ`:
///
/// ```text
/// v (K v')' - (v²/ω)(L ω')' + (K-L) v'² + L (v' - ω' v/ω)²
///     = [ (v/ω)(K v' ω - L v ω') ]'
/// ```
///
/// The left side comes from the closed forms (second derivatives through the
/// Hermite-type equation), the right side from central differences. Returns
/// the largest residual over the grid, relative to the local term magnitudes.
pub fn picone_residual(
    v_ab: (f64, f64),
    omega_ab: (f64, f64),
    weight_exponent: i32,
    r_range: (f64, f64),
    grid: usize,
) -> Result<f64, RegimeError> {
    assert!(grid >= 2 && r_range.0 > 0.0 && r_range.0 < r_range.1);
    let value = |ab: (f64, f64), r: f64| -> Result<f64, KummerError> {
        kummer::kummer_m(KummerArgs::new(ab.0, ab.1, r * r / 4.0))
    };
    let deriv = |ab: (f64, f64), r: f64| -> Result<f64, KummerError> {
        Ok(kummer::kummer_m_dxi(KummerArgs::new(ab.0, ab.1, r * r / 4.0))? * r / 2.0)
    };
    // (K u')' = r^m ρ (u'' + (m/r - r/2) u') with u'' from the Hermite form
    // u'' = -((2b-1)/r - r/2) u' + a u.
    let weighted_flux_prime = |ab: (f64, f64), r: f64| -> Result<f64, KummerError> {
        let u = value(ab, r)?;
        let up = deriv(ab, r)?;
        let upp = -((2.0 * ab.1 - 1.0) / r - r / 2.0) * up + ab.0 * u;
        let m = weight_exponent as f64;
        Ok(r.powi(weight_exponent) * fields::weight_rho(r) * (upp + (m / r - r / 2.0) * up))
    };
    let flux = |r: f64| -> Result<f64, RegimeError> {
        let v = value(v_ab, r)?;
        let w = value(omega_ab, r)?;
        if w.abs() < 1e-12 {
            return Err(RegimeError::OmegaVanishes { r });
        }
        let vp = deriv(v_ab, r)?;
        let wp = deriv(omega_ab, r)?;
        let k = r.powi(weight_exponent) * fields::weight_rho(r);
        Ok(v / w * k * (vp * w - v * wp))
    };

    let mut worst = 0.0_f64;
    for idx in 0..grid {
        let r = r_range.0 + (r_range.1 - r_range.0) * idx as f64 / (grid - 1) as f64;
        let v = value(v_ab, r)?;
        let w = value(omega_ab, r)?;
        if w.abs() < 1e-12 {
            return Err(RegimeError::OmegaVanishes { r });
        }
        let vp = deriv(v_ab, r)?;
        let wp = deriv(omega_ab, r)?;
        let k = r.powi(weight_exponent) * fields::weight_rho(r);

        let t1 = v * weighted_flux_prime(v_ab, r)?;
        let t2 = v * v / w * weighted_flux_prime(omega_ab, r)?;
        let t3 = k * (vp - wp * v / w) * (vp - wp * v / w);
        let lhs = t1 - t2 + t3;

        let h = 1e-5 * (1.0 + r);
        let rhs = (flux(r + h)? - flux(r - h)?) / (2.0 * h);

        let scale = t1.abs() + t2.abs() + t3.abs() + rhs.abs();
        if scale > 1e-280 {
            worst = worst.max((lhs - rhs).abs() / scale);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::sobolev_exponent;

    fn params(n: u32, p: f64, lambda: f64) -> ProblemParams {
        ProblemParams::new(n, p, lambda).unwrap()
    }

    #[test]
    fn analytic_ranges() {
        let p = params(5, sobolev_exponent(5), 0.5);
        assert_eq!(analytic_prediction(&p, p.mu()), Classification::PositiveDefinite);
        let p = params(4, 3.0, 2.0);
        assert_eq!(
            analytic_prediction(&p, p.mu()),
            Classification::NegativeDefiniteRadial
        );
        let p = params(3, 5.0, 1.5);
        assert_eq!(analytic_prediction(&p, p.mu()), Classification::Indefinite);
    }

    #[test]
    fn classify_positive_definite() {
        let p = params(5, sobolev_exponent(5), 0.5);
        let report = classify(&p, 30.0, 600).unwrap();
        assert_eq!(report.classification, Classification::PositiveDefinite);
        assert_eq!(report.classification, report.analytic_prediction);
    }

    #[test]
    fn classify_negative_definite_radial() {
        let p = params(4, 3.0, 2.0);
        let report = classify(&p, 30.0, 600).unwrap();
        assert_eq!(report.classification, Classification::NegativeDefiniteRadial);
        assert_eq!(report.classification, report.analytic_prediction);
    }

    #[test]
    fn classify_indefinite_with_witness() {
        let p = params(3, 5.0, 1.5);
        let report = classify(&p, 30.0, 600).unwrap();
        assert_eq!(report.classification, Classification::Indefinite);
        let pi_changes: Vec<_> = report
            .evidence
            .iter()
            .filter(|e| e.quantity == Quantity::Pi)
            .collect();
        assert!(!pi_changes.is_empty(), "expected a recorded sign change of Pi");
        // positive at the origin, negative asymptotically
        assert!(fields::pi_origin_limit(&p) > 0.0);
        assert_eq!(pi_changes[0].new_sign, -1);
    }

    #[test]
    fn positive_grid_includes_p_three_slice() {
        // I > 0, J >= 0 over the admissible grid with the extra p = 3 slice
        // for the dimensions where 3 <= p_S
        for &n in &[3u32, 4] {
            for &mu in &[-(n as f64) / 2.0, 0.0, 0.5, 1.0] {
                let p = params(n, 3.0, mu).with_mu(mu);
                let report = classify(&p, 30.0, 500).unwrap();
                assert_eq!(
                    report.classification,
                    Classification::PositiveDefinite,
                    "n={n} p=3 mu={mu}"
                );
            }
        }
    }

    #[test]
    fn boundary_j_zero_not_a_sign_change() {
        // mu = 1: J identically zero must not generate evidence
        let p = params(3, 3.0, 1.0);
        let report = classify(&p, 30.0, 600).unwrap();
        assert_eq!(report.classification, Classification::PositiveDefinite);
        assert!(report.evidence.iter().all(|e| e.quantity != Quantity::J));
    }

    #[test]
    fn asymptotic_sign_table() {
        assert!(asymptotic_sign(1.0).is_err());
        assert_eq!(asymptotic_sign(1.5).unwrap(), -1);
        assert_eq!(asymptotic_sign(2.0).unwrap(), -1);
        assert_eq!(asymptotic_sign(2.5).unwrap(), 1);
        assert_eq!(asymptotic_sign(3.0).unwrap(), 1);
        assert_eq!(asymptotic_sign(3.5).unwrap(), -1);
        assert_eq!(asymptotic_sign(4.0).unwrap(), -1);
        assert_eq!(asymptotic_sign(4.7).unwrap(), 1);
    }

    #[test]
    fn sturm_markers_ordering() {
        let p = params(5, sobolev_exponent(5), 2.5);
        let m = sturm_markers(&p).unwrap();
        assert!(0.0 < m.root_u3 && m.root_u3 < m.iota && m.iota < m.kappa);
        assert!(fields::pi_profile(&p, m.iota).unwrap() < 0.0);
    }

    #[test]
    fn sturm_markers_no_kappa_for_small_lambda() {
        let p = params(3, 5.0, 1.5);
        assert_eq!(
            sturm_markers(&p),
            Err(RegimeError::NoKappa { lambda: 1.5 })
        );
    }

    #[test]
    fn sturm_markers_second_window() {
        let p = params(4, 3.0, 3.5);
        let m = sturm_markers(&p).unwrap();
        let k2 = m.kappa2.expect("u1 should have a second root for lambda = 3.5");
        let i2 = m.iota2.expect("u2 should have a root between kappa and kappa'");
        assert!(m.kappa < i2 && i2 < k2);
        assert!(fields::pi_profile(&p, i2).unwrap() > 0.0);
    }

    #[test]
    fn u2_monotone_down_to_iota() {
        // u2'(r) < 0 on (0, iota]
        for &(n, lambda) in &[(3u32, 2.5), (5, 2.5), (4, 3.5)] {
            let p = params(n, sobolev_exponent(n), lambda);
            let m = sturm_markers(&p).unwrap();
            let half_n = p.nf() / 2.0;
            for k in 1..=20 {
                let r = m.iota * k as f64 / 20.0;
                let du = kummer::kummer_m_dxi(KummerArgs::new(1.0 - lambda, half_n + 2.0, r * r / 4.0))
                    .unwrap()
                    * r
                    / 2.0;
                assert!(du < 0.0, "u2'({r}) = {du} at n={n}, lambda={lambda}");
            }
        }
    }

    #[test]
    fn u_system_ode_residuals() {
        // each u_i satisfies (r^m ρ u')' + c ρ r^m u = 0 with
        // (m, c) = (n+3, λ-2), (n+3, λ-1), (n+1, λ-1)
        let lambda = 2.5;
        for &n in &[3u32, 4, 5] {
            let nf = n as f64;
            let cases = [
                (2.0 - lambda, nf / 2.0 + 2.0, nf + 3.0, lambda - 2.0),
                (1.0 - lambda, nf / 2.0 + 2.0, nf + 3.0, lambda - 1.0),
                (1.0 - lambda, nf / 2.0 + 1.0, nf + 1.0, lambda - 1.0),
            ];
            for &(a, b, m, c) in &cases {
                let mut r = 0.2;
                while r < 12.0 {
                    let xi = r * r / 4.0;
                    let u = kummer::kummer_m(KummerArgs::new(a, b, xi)).unwrap();
                    let up = kummer::kummer_m_dxi(KummerArgs::new(a, b, xi)).unwrap() * r / 2.0;
                    let upp = -((2.0 * b - 1.0) / r - r / 2.0) * up + a * u;
                    // (r^m ρ u')'/(r^m ρ) = u'' + (m/r - r/2) u'
                    let lhs = upp + (m / r - r / 2.0) * up + c * u;
                    let scale = upp.abs() + ((m / r - r / 2.0) * up).abs() + (c * u).abs();
                    assert!(lhs.abs() <= 1e-7 * scale.max(1e-280), "n={n} a={a} r={r}");
                    r += 0.7;
                }
            }
        }
    }

    #[test]
    fn picone_identity_collapses_for_equal_functions() {
        let res = picone_residual((1.5, 3.0), (1.5, 3.0), 5, (0.2, 3.0), 50).unwrap();
        assert!(res <= 1e-9, "residual {res}");
    }

    #[test]
    fn picone_identity_u1_u2_and_u2_u3() {
        // each range stops short of the first root of the denominator ω
        let (n, lambda) = (3u32, 2.5);
        let p = params(n, sobolev_exponent(n), lambda);
        let m = sturm_markers(&p).unwrap();
        let half_n = p.nf() / 2.0;
        let res = picone_residual(
            (2.0 - lambda, half_n + 2.0),
            (1.0 - lambda, half_n + 2.0),
            n as i32 + 3,
            (0.1, m.iota - 0.05),
            120,
        )
        .unwrap();
        assert!(res <= 1e-6, "u1/u2 residual {res}");
        let res = picone_residual(
            (1.0 - lambda, half_n + 2.0),
            (1.0 - lambda, half_n + 1.0),
            n as i32 + 1,
            (0.1, m.root_u3 - 0.05),
            120,
        )
        .unwrap();
        assert!(res <= 1e-6, "u2/u3 residual {res}");
    }

    #[test]
    fn picone_omega_vanishing_detected() {
        let (n, lambda) = (3u32, 2.5);
        let half_n = n as f64 / 2.0;
        // polish u2's first root to the last bit so a grid point lands on it
        let p = params(n, sobolev_exponent(n), lambda);
        let iota = sturm_markers(&p).unwrap().iota;
        let f = |r: f64| {
            kummer::kummer_m(KummerArgs::new(1.0 - lambda, half_n + 2.0, r * r / 4.0)).unwrap()
        };
        let (mut lo, mut hi) = (iota - 1e-6, iota + 1e-6);
        let mut flo = f(lo);
        while hi - lo > f64::EPSILON * hi {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid);
            if flo * fm <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        let root = 0.5 * (lo + hi);
        // grid of 3 points puts the midpoint exactly on the polished root
        let err = picone_residual(
            (2.0 - lambda, half_n + 2.0),
            (1.0 - lambda, half_n + 2.0),
            n as i32 + 3,
            (root - 0.5, root + 0.5),
            3,
        );
        assert!(matches!(err, Err(RegimeError::OmegaVanishes { .. })));
    }
}

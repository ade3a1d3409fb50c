//! Radial shooting for the reduced equation
//!
//! ```text
//! w'' + ((n-1)/r - r/2) w' - λ/(p-1)·w + |w|^{p-1} w = 0,   w(0) = α, w'(0) = 0,
//! ```
//!
//! probing the existence landscape: for most amplitudes the trajectory either
//! blows up or crosses zero and decays, and a bounded profile sits on the
//! boundary between the two regimes. [`find_bounded_profile`] locates that
//! boundary by bisection on α.
//!
//! The coefficient `(n-1)/r` is singular at the origin, so integration starts
//! at `r = 1e-4` from the second-order Taylor seed `w(h) = α + h²/2·w''(0)`
//! with `n·w''(0) = λ/(p-1)·α - |α|^{p-1}α`.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::fields::ProblemParams;
use crate::numerics::{self, NumericsError, OdeOutcome, OdeSpec};

/// Seed radius for the Taylor start.
const SEED_RADIUS: f64 = 1e-4;
/// |w(r_end)| below this fraction of |α| counts as decayed after a crossing.
const DECAY_FRACTION: f64 = 0.1;
/// Tolerance for recognising convergence to a constant solution.
const CONSTANT_TOL: f64 = 1e-6;
/// Bisection on α stops below this relative bracket width. Tight enough that
/// the returned profile tracks the bounded solution past r ≈ 12 before the
/// growing mode surfaces.
const ALPHA_REL_TOL: f64 = 1e-14;

/// Qualitative outcome of a shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    /// |w| exceeded the blow-up threshold before `r_end`.
    BlowUp,
    /// w changed sign and |w(r_end)| fell below a tenth of |α|.
    CrossedZeroAndDecayed,
    /// Bounded but matching neither the constants nor the crossing pattern.
    BoundedCandidate,
    /// w(r_end) sits within 1e-6 of a constant solution with |w'(r_end)| < 1e-6.
    ConvergedToConstant,
}

/// A radial profile `w(r)` with its derivative and classification.
#[derive(Debug, Clone, Serialize)]
pub struct ShootResult {
    pub alpha: f64,
    pub grid: Vec<f64>,
    pub w: Vec<f64>,
    pub w_prime: Vec<f64>,
    pub outcome: Outcome,
    pub sup_norm: f64,
    /// Second derivatives at the nodes (from the right-hand side); kept for
    /// fourth-order interpolation of `w'` between nodes.
    #[serde(skip)]
    w_second: Vec<f64>,
}

/// Summary view without the bulk arrays, for JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct ShootSummary {
    pub alpha: f64,
    pub outcome: Outcome,
    pub sup_norm: f64,
    pub r_end: f64,
    pub w_end: f64,
    pub w_prime_end: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShootError {
    #[error("endpoint outcomes agree ({lo:?} / {hi:?}); no bisection bracket")]
    NoBracket { lo: Outcome, hi: Outcome },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Constant solutions of the equation: `0`, and `±(λ/(p-1))^{1/(p-1)}` when
/// `λ > 0`. Sorted ascending.
pub fn constant_solutions(lambda: f64, p: f64) -> Vec<f64> {
    assert!(p > 1.0);
    if lambda > 0.0 {
        let c = (lambda / (p - 1.0)).powf(1.0 / (p - 1.0));
        vec![-c, 0.0, c]
    } else {
        vec![0.0]
    }
}

fn rhs(params: &ProblemParams) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    let nf = params.nf();
    let lam_c = params.lambda / (params.p - 1.0);
    let p = params.p;
    move |r, y| {
        let (w, wp) = (y[0], y[1]);
        let drift = (nf - 1.0) / r - r / 2.0;
        [wp, -drift * wp + lam_c * w - w.abs().powf(p - 1.0) * w]
    }
}

/// Integrate a single shot from `w(0) = α` out to `r_end` and classify it.
pub fn integrate_profile(
    params: &ProblemParams,
    alpha: f64,
    r_end: f64,
    ode: &OdeSpec,
) -> Result<ShootResult, ShootError> {
    assert!(alpha.is_finite());
    assert!(r_end > SEED_RADIUS && r_end <= 40.0, "r_end must lie in (0, 40]");

    let f = rhs(params);
    let lam_c = params.lambda / (params.p - 1.0);
    let wpp0 = (lam_c * alpha - alpha.abs().powf(params.p - 1.0) * alpha) / params.nf();
    let h = SEED_RADIUS;
    let seed = [alpha + h * h / 2.0 * wpp0, h * wpp0];
    let traj = numerics::rk_adaptive(&f, h, seed, r_end, ode)?;

    let mut grid = Vec::with_capacity(traj.r.len() + 1);
    let mut w = Vec::with_capacity(traj.r.len() + 1);
    let mut w_prime = Vec::with_capacity(traj.r.len() + 1);
    let mut w_second = Vec::with_capacity(traj.r.len() + 1);
    grid.push(0.0);
    w.push(alpha);
    w_prime.push(0.0);
    w_second.push(wpp0);
    for k in 0..traj.r.len() {
        grid.push(traj.r[k]);
        w.push(traj.states[k][0]);
        w_prime.push(traj.states[k][1]);
        w_second.push(traj.derivs[k][1]);
    }

    let sup_norm = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let blew_up = matches!(traj.outcome, OdeOutcome::BlowUp { .. });
    let crossed = w.windows(2).any(|pair| pair[0] * pair[1] < 0.0);
    let (w_end, wp_end) = (*w.last().unwrap(), *w_prime.last().unwrap());

    let outcome = if blew_up {
        Outcome::BlowUp
    } else if crossed && w_end.abs() < DECAY_FRACTION * alpha.abs() {
        Outcome::CrossedZeroAndDecayed
    } else if constant_solutions(params.lambda, params.p)
        .iter()
        .any(|c| (w_end - c).abs() < CONSTANT_TOL)
        && wp_end.abs() < CONSTANT_TOL
    {
        Outcome::ConvergedToConstant
    } else {
        Outcome::BoundedCandidate
    };

    Ok(ShootResult {
        alpha,
        grid,
        w,
        w_prime,
        outcome,
        sup_norm,
        w_second,
    })
}

/// Rebuild a profile from stored arrays (e.g. a CSV read back from disk),
/// recomputing the nodal second derivatives from the equation.
pub fn profile_from_arrays(
    params: &ProblemParams,
    grid: Vec<f64>,
    w: Vec<f64>,
    w_prime: Vec<f64>,
    outcome: Outcome,
) -> ShootResult {
    assert_eq!(grid.len(), w.len());
    assert_eq!(grid.len(), w_prime.len());
    let f = rhs(params);
    let lam_c = params.lambda / (params.p - 1.0);
    let w_second: Vec<f64> = grid
        .iter()
        .zip(w.iter().zip(&w_prime))
        .map(|(&r, (&wv, &wpv))| {
            if r == 0.0 {
                (lam_c * wv - wv.abs().powf(params.p - 1.0) * wv) / params.nf()
            } else {
                f(r, &[wv, wpv])[1]
            }
        })
        .collect();
    let alpha = w[0];
    let sup_norm = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    ShootResult {
        alpha,
        grid,
        w,
        w_prime,
        outcome,
        sup_norm,
        w_second,
    }
}

impl ShootResult {
    /// Interpolated `(w, w')` at radius `r` (cubic Hermite per component).
    pub fn sample(&self, r: f64) -> (f64, f64) {
        let n = self.grid.len();
        assert!(
            r >= self.grid[0] - 1e-12 && r <= self.grid[n - 1] + 1e-12,
            "sample radius {r} outside profile range"
        );
        let j = match self
            .grid
            .binary_search_by(|x| x.partial_cmp(&r).unwrap())
        {
            Ok(i) => return (self.w[i], self.w_prime[i]),
            Err(0) => 1,
            Err(i) if i == n => n - 1,
            Err(i) => i,
        };
        let i = j - 1;
        let (r0, r1) = (self.grid[i], self.grid[j]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let w = h00 * self.w[i] + h10 * h * self.w_prime[i] + h01 * self.w[j]
            + h11 * h * self.w_prime[j];
        let wp = h00 * self.w_prime[i] + h10 * h * self.w_second[i] + h01 * self.w_prime[j]
            + h11 * h * self.w_second[j];
        (w, wp)
    }

    pub fn r_end(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn summary(&self) -> ShootSummary {
        ShootSummary {
            alpha: self.alpha,
            outcome: self.outcome,
            sup_norm: self.sup_norm,
            r_end: self.r_end(),
            w_end: *self.w.last().unwrap(),
            w_prime_end: *self.w_prime.last().unwrap(),
            points: self.grid.len(),
        }
    }

    /// CSV with header `r,w,w_prime`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "r,w,w_prime")?;
        for k in 0..self.grid.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e}",
                self.grid[k], self.w[k], self.w_prime[k]
            )?;
        }
        Ok(())
    }
}

/// Which way a shot departs from the decaying regime, in the sign convention
/// of `α`: `Some(true)` when `w` turns back up (a positive local minimum,
/// `w' > 0` while `w·sign(α) > 0`) before ever crossing zero, `Some(false)`
/// when it crosses zero first, `None` if neither happens on the stored range.
/// The boundary between the two α-sides is the bounded profile.
fn departure_side(result: &ShootResult) -> Option<bool> {
    let s = result.alpha.signum();
    if s == 0.0 {
        return None;
    }
    for k in 1..result.grid.len() {
        if s * result.w[k] <= 0.0 {
            return Some(false);
        }
        if s * result.w_prime[k] > 0.0 {
            return Some(true);
        }
    }
    None
}

/// max |w'| over `[lo, hi]` at the stored nodes.
fn max_wp(result: &ShootResult, lo: f64, hi: f64) -> f64 {
    result
        .grid
        .iter()
        .zip(&result.w_prime)
        .filter(|(&r, _)| r >= lo && r <= hi)
        .fold(0.0f64, |m, (_, &wp)| m.max(wp.abs()))
}

/// Bisect the initial amplitude between two shots that depart in opposite
/// directions until the bracket collapses, then vet the boundary profile: it
/// qualifies as a bounded candidate if its sup norm stays below
/// `10·max(|α_lo|, |α_hi|)` and `|w'|` keeps decaying over the final quarter
/// of the range. Returns `None` when the vetting fails.
///
/// Midpoints are classified by [`departure_side`] on a probe integration over
/// the full supported range (departing trajectories exit early at the blow-up
/// threshold, so the long probes are cheap). The drift term amplifies a
/// departure roughly like `e^{r²/4}`, which keeps the α-step resolvable all
/// the way down to the last bits of the bracket.
pub fn find_bounded_profile(
    params: &ProblemParams,
    alpha_lo: f64,
    alpha_hi: f64,
    r_end: f64,
    max_iters: usize,
    ode: &OdeSpec,
) -> Result<Option<ShootResult>, ShootError> {
    let sup_cap = 10.0 * alpha_lo.abs().max(alpha_hi.abs());
    let r_probe = 40.0_f64.max(r_end);
    // Both departure events fire while |w| is still of the order of α; a low
    // threshold cuts the probes off right after the event instead of chasing
    // the ever-faster post-departure oscillation.
    let probe_ode = OdeSpec {
        blowup_threshold: 20.0 * (1.0 + alpha_lo.abs().max(alpha_hi.abs())),
        ..*ode
    };

    let probe = |alpha: f64| -> Result<(Option<bool>, Outcome), ShootError> {
        let res = integrate_profile(params, alpha, r_probe, &probe_ode)?;
        Ok((departure_side(&res), res.outcome))
    };
    let (lo_side, lo_outcome) = probe(alpha_lo)?;
    let (hi_side, hi_outcome) = probe(alpha_hi)?;
    let sides_ok = matches!((lo_side, hi_side), (Some(a), Some(b)) if a != b);
    if !sides_ok {
        return Err(ShootError::NoBracket {
            lo: lo_outcome,
            hi: hi_outcome,
        });
    }
    let lo_side = lo_side.unwrap();

    let (mut lo, mut hi) = (alpha_lo, alpha_hi);
    for _ in 0..max_iters {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() < ALPHA_REL_TOL * (1.0 + mid.abs()) || mid == lo || mid == hi {
            break;
        }
        match probe(mid)?.0 {
            Some(side) if side == lo_side => lo = mid,
            Some(_) => hi = mid,
            // neither turned up nor crossed over the whole probe range: as
            // bounded as the discriminator can tell
            None => {
                lo = mid;
                hi = mid;
            }
        }
        if lo == hi {
            break;
        }
    }

    let result = integrate_profile(params, 0.5 * (lo + hi), r_end, ode)?;
    let q3 = max_wp(&result, 0.5 * r_end, 0.75 * r_end);
    let q4 = max_wp(&result, 0.75 * r_end, r_end);
    if result.sup_norm <= sup_cap && q4 <= q3 {
        Ok(Some(ShootResult {
            outcome: Outcome::BoundedCandidate,
            ..result
        }))
    } else {
        Ok(None)
    }
}
